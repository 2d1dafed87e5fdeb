#pragma once

#include "qkham/config.hpp"
#include "qkham/diagnostics.hpp"
#include "qkham/dual.hpp"
#include "qkham/dynamics.hpp"
#include "qkham/expression.hpp"
#include "qkham/forms.hpp"
#include "qkham/io.hpp"
#include "qkham/matrix.hpp"
#include "qkham/run.hpp"
#include "qkham/structures.hpp"
