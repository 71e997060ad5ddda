#pragma once

// Umbrella header: correspondence-field-driven 6-DoF pose refinement.

#include "poseref/camera.hpp"
#include "poseref/correspondence.hpp"
#include "poseref/errors.hpp"
#include "poseref/field.hpp"
#include "poseref/harness.hpp"
#include "poseref/lm.hpp"
#include "poseref/metrics.hpp"
#include "poseref/model.hpp"
#include "poseref/refine.hpp"
#include "poseref/rng.hpp"
#include "poseref/scene.hpp"
#include "poseref/se3.hpp"
