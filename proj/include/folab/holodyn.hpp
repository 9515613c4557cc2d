#pragma once

#include "folab/holodyn/germ.hpp"
#include "folab/holodyn/holonomy.hpp"
