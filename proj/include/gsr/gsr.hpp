#pragma once

#include "gsr/error.hpp"
#include "gsr/parallel.hpp"
#include "gsr/primes.hpp"
#include "gsr/torus_point.hpp"
#include "gsr/target.hpp"
#include "gsr/zeta.hpp"
#include "gsr/mollifier.hpp"
#include "gsr/stats.hpp"
#include "gsr/torus.hpp"
#include "gsr/lattice.hpp"
#include "gsr/kronecker.hpp"
#include "gsr/scanner.hpp"
#include "gsr/io.hpp"
