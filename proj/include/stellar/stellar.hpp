#pragma once

#include "stellar/cp_complex.hpp"
#include "stellar/decomposition.hpp"
#include "stellar/error.hpp"
#include "stellar/generators.hpp"
#include "stellar/io.hpp"
#include "stellar/queries.hpp"
#include "stellar/reindex.hpp"
#include "stellar/sre.hpp"
#include "stellar/stats.hpp"
#include "stellar/synth.hpp"
