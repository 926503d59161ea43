#pragma once

#include "traffic_eq/bootstrap.hpp"
#include "traffic_eq/bpr.hpp"
#include "traffic_eq/errors.hpp"
#include "traffic_eq/flow_oracle.hpp"
#include "traffic_eq/frank_wolfe.hpp"
#include "traffic_eq/link_vector.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/network.hpp"
#include "traffic_eq/solve.hpp"
#include "traffic_eq/solver_types.hpp"
#include "traffic_eq/ugm.hpp"
#include "traffic_eq/umst.hpp"
#include "traffic_eq/wda.hpp"
