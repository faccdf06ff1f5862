#pragma once
#include "abgroup.hpp"
#include "catalog.hpp"
#include "common.hpp"
#include "engine.hpp"
#include "homs.hpp"
#include "oracle.hpp"
#include "parse.hpp"
#include "ringprops.hpp"
