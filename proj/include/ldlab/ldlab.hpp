#pragma once

#include "braid.hpp"
#include "crit.hpp"
#include "laver_table.hpp"
#include "order.hpp"
#include "outcome.hpp"
#include "sigma_search.hpp"
#include "table_cache.hpp"
#include "term.hpp"
