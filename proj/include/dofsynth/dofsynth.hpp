#pragma once

// Umbrella header: synthetic depth of field, dual-pixel view synthesis,
// and rotated-kernel multi-view motion from a single image + depth map.

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"
#include "dofsynth/io/formats.hpp"
#include "dofsynth/io/gif.hpp"
#include "dofsynth/io/pfm.hpp"
#include "dofsynth/io/png.hpp"
#include "dofsynth/io/pnm.hpp"
#include "dofsynth/layering.hpp"
#include "dofsynth/optics.hpp"
#include "dofsynth/oracle.hpp"
#include "dofsynth/psf.hpp"
#include "dofsynth/renderer.hpp"
#include "dofsynth/scene.hpp"
