#ifndef PMLE_PMLE_HPP
#define PMLE_PMLE_HPP

#include "pmle/lattice.hpp"
#include "pmle/support.hpp"
#include "pmle/config.hpp"
#include "pmle/rules.hpp"
#include "pmle/views.hpp"
#include "pmle/algorithm.hpp"
#include "pmle/generators.hpp"
#include "pmle/scheduler.hpp"
#include "pmle/oracle.hpp"
#include "pmle/svg.hpp"

#endif  // PMLE_PMLE_HPP
