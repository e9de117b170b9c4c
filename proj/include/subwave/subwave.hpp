// SPDX-License-Identifier: Apache-2.0
//
// subwave: sub-wavelength displacement recovery from cross-antenna channel ratios
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

#pragma once

#include "subwave/amplitude_filter.hpp"
#include "subwave/channel_model.hpp"
#include "subwave/channel_trace.hpp"
#include "subwave/circle_fit.hpp"
#include "subwave/core.hpp"
#include "subwave/correction.hpp"
#include "subwave/envelope.hpp"
#include "subwave/mapping.hpp"
#include "subwave/ratio.hpp"
#include "subwave/rotation.hpp"
