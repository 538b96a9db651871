#pragma once

#include "nslp/bsf.hpp"
#include "nslp/cost_model.hpp"
#include "nslp/cross.hpp"
#include "nslp/drift.hpp"
#include "nslp/experiment.hpp"
#include "nslp/linalg.hpp"
#include "nslp/lp.hpp"
#include "nslp/model_n.hpp"
#include "nslp/oracle.hpp"
#include "nslp/order.hpp"
#include "nslp/quest.hpp"
#include "nslp/svg.hpp"
#include "nslp/targeting.hpp"
#include "nslp/tracking.hpp"
