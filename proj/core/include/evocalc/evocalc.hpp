#pragma once

#include "evocalc/banded.hpp"
#include "evocalc/error.hpp"
#include "evocalc/evo_solver.hpp"
#include "evocalc/fourier_laplace.hpp"
#include "evocalc/material_law.hpp"
#include "evocalc/operator_function.hpp"
#include "evocalc/parallel.hpp"
#include "evocalc/sl_reduction.hpp"
#include "evocalc/spatial_system.hpp"
#include "evocalc/weighted_time.hpp"
