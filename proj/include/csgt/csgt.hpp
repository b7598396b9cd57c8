#pragma once

// Umbrella header for the compressed-sensing gray-transform codec.

#include "csgt/basis.hpp"
#include "csgt/bench.hpp"
#include "csgt/bitstream.hpp"
#include "csgt/codec.hpp"
#include "csgt/error.hpp"
#include "csgt/gray_transform.hpp"
#include "csgt/huffman.hpp"
#include "csgt/image.hpp"
#include "csgt/metrics.hpp"
#include "csgt/prng.hpp"
#include "csgt/quantizer.hpp"
#include "csgt/reconstruction.hpp"
#include "csgt/sensing.hpp"
