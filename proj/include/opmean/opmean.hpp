#pragma once

#include "descriptors.hpp"
#include "error.hpp"
#include "hpdcore.hpp"
#include "karcher.hpp"
#include "koenigs.hpp"
#include "kubo.hpp"
#include "properties.hpp"
#include "report.hpp"
#include "sampling.hpp"
#include "scalar.hpp"
#include "thompson.hpp"
