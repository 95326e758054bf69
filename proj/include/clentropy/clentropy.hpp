#pragma once

#include "clentropy/interval.hpp"
#include "clentropy/partitions.hpp"
#include "clentropy/groups.hpp"
#include "clentropy/measures.hpp"
#include "clentropy/entropy.hpp"
#include "clentropy/zeta.hpp"
#include "clentropy/report.hpp"
#include "clentropy/verify.hpp"
