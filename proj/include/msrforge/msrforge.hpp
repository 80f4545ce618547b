#pragma once

#include "msrforge/gf.hpp"
#include "msrforge/matrix.hpp"
#include "msrforge/base_code.hpp"
#include "msrforge/transform.hpp"
#include "msrforge/descriptor.hpp"
#include "msrforge/repair.hpp"
#include "msrforge/reconstruct.hpp"
#include "msrforge/cluster.hpp"
#include "msrforge/file_codec.hpp"
