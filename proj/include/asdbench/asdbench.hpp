/* Copyright 2026 The asdbench Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include "asdbench/error.hpp"
#include "asdbench/log.hpp"
#include "asdbench/rng.hpp"
#include "asdbench/corpus/clip_path.hpp"
#include "asdbench/corpus/dataset.hpp"
#include "asdbench/corpus/synth.hpp"
#include "asdbench/corpus/wav.hpp"
#include "asdbench/dsp/feature_cache.hpp"
#include "asdbench/dsp/logmel.hpp"
#include "asdbench/dsp/windows.hpp"
#include "asdbench/nnet/adam.hpp"
#include "asdbench/nnet/backward.hpp"
#include "asdbench/nnet/model_io.hpp"
#include "asdbench/nnet/train.hpp"
#include "asdbench/detectors/factory.hpp"
#include "asdbench/eval/metrics.hpp"
#include "asdbench/eval/report.hpp"
#include "asdbench/eval/score_files.hpp"
