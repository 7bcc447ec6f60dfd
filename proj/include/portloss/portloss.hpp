#ifndef PORTLOSS_PORTLOSS_HPP
#define PORTLOSS_PORTLOSS_HPP

#include "portloss/continuous.hpp"
#include "portloss/jump.hpp"
#include "portloss/model.hpp"
#include "portloss/montecarlo.hpp"
#include "portloss/numerics.hpp"

#endif
