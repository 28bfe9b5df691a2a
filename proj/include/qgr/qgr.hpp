#pragma once

#include "qgr/config.hpp"
#include "qgr/coupling.hpp"
#include "qgr/criteria.hpp"
#include "qgr/errors.hpp"
#include "qgr/exppoly.hpp"
#include "qgr/gallery.hpp"
#include "qgr/graph.hpp"
#include "qgr/qgf.hpp"
#include "qgr/rational.hpp"
#include "qgr/report.hpp"
#include "qgr/secular.hpp"
#include "qgr/zeros.hpp"
