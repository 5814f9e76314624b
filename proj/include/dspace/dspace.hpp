#pragma once

#include "dspace/bench.hpp"
#include "dspace/dv.hpp"
#include "dspace/error.hpp"
#include "dspace/expr.hpp"
#include "dspace/index.hpp"
#include "dspace/metric.hpp"
#include "dspace/rdf.hpp"
#include "dspace/registry.hpp"
#include "dspace/schema.hpp"
#include "dspace/search.hpp"
#include "dspace/service.hpp"
#include "dspace/snapshot_io.hpp"
#include "dspace/store.hpp"
#include "dspace/text.hpp"
#include "dspace/values.hpp"
