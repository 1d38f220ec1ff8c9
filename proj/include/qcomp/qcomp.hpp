#pragma once

#include "qcomp/asymptotics.hpp"
#include "qcomp/errors.hpp"
#include "qcomp/estimators.hpp"
#include "qcomp/exact.hpp"
#include "qcomp/experiments.hpp"
#include "qcomp/network.hpp"
#include "qcomp/replication.hpp"
#include "qcomp/rng.hpp"
#include "qcomp/settings.hpp"
#include "qcomp/table.hpp"
