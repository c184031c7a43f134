#pragma once

#include "cantion/errors.hpp"
#include "cantion/core_model.hpp"
#include "cantion/gaussian_moments.hpp"
#include "cantion/dopri5.hpp"
#include "cantion/ansatz_dynamics.hpp"
#include "cantion/rwa_analytic.hpp"
#include "cantion/fock_oracle.hpp"
#include "cantion/simulation.hpp"
#include "cantion/validation.hpp"
