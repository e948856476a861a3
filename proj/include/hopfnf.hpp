#pragma once

#include "hopfnf/error.hpp"
#include "hopfnf/multi_index.hpp"
#include "hopfnf/linalg.hpp"
#include "hopfnf/polymap.hpp"
#include "hopfnf/subresonance.hpp"
#include "hopfnf/homological.hpp"
#include "hopfnf/normal_form.hpp"
#include "hopfnf/gx_group.hpp"
#include "hopfnf/io.hpp"
#include "hopfnf/cli.hpp"
