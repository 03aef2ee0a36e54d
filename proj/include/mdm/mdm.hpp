#pragma once

#include "mdm/active_set.hpp"
#include "mdm/coeff_tables.hpp"
#include "mdm/decomposition.hpp"
#include "mdm/engines.hpp"
#include "mdm/error.hpp"
#include "mdm/integrands.hpp"
#include "mdm/lattice.hpp"
#include "mdm/parallel.hpp"
#include "mdm/pipeline.hpp"
#include "mdm/pod_weights.hpp"
#include "mdm/quad1d.hpp"
#include "mdm/setkit.hpp"
#include "mdm/smolyak.hpp"
#include "mdm/summation.hpp"
#include "mdm/tolerance.hpp"
