#pragma once

#include "funroot/error.hpp"
#include "funroot/far.hpp"
#include "funroot/funcspace.hpp"
#include "funroot/io.hpp"
#include "funroot/operators.hpp"
#include "funroot/report.hpp"
#include "funroot/rng.hpp"
#include "funroot/stats.hpp"
#include "funroot/unitroot.hpp"
