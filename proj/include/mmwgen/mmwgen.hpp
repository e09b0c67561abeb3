// SPDX-License-Identifier: Apache-2.0
//
// mmwgen - generative millimeter wave channel models
// Copyright (C) 2026 The mmwgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Umbrella header.
#ifndef MMWGEN_MMWGEN_HPP
#define MMWGEN_MMWGEN_HPP

#include "mmwgen/antenna_snr.hpp"
#include "mmwgen/channel_domain.hpp"
#include "mmwgen/channel_generator.hpp"
#include "mmwgen/dataset_io.hpp"
#include "mmwgen/eval_stats.hpp"
#include "mmwgen/link_state_model.hpp"
#include "mmwgen/path_vae.hpp"
#include "mmwgen/propagation.hpp"
#include "mmwgen/tensor_nn.hpp"

#endif
