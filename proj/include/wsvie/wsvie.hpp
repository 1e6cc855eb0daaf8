#pragma once

// Walsh-function collocation solver for nonlinear stochastic Volterra
// integral equations, with an Euler-Maruyama reference and Monte Carlo
// error statistics.

#include "brownian.hpp"
#include "csv.hpp"
#include "experiment.hpp"
#include "expression.hpp"
#include "matrix.hpp"
#include "operational.hpp"
#include "oracle.hpp"
#include "problem.hpp"
#include "problem_file.hpp"
#include "solver.hpp"
#include "walsh.hpp"
