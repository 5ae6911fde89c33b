#pragma once

#include "sl2b/localfield.hpp"
#include "sl2b/sl2group.hpp"
#include "sl2b/parallel.hpp"
#include "sl2b/abelian.hpp"
#include "sl2b/classfun.hpp"
#include "sl2b/fqchars.hpp"
#include "sl2b/tori.hpp"
#include "sl2b/shalika.hpp"
#include "sl2b/yudata.hpp"
#include "sl2b/branching.hpp"
