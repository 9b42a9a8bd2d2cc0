#pragma once

#include "sfrc/bandpass.hpp"
#include "sfrc/core.hpp"
#include "sfrc/degrade.hpp"
#include "sfrc/fft.hpp"
#include "sfrc/frc.hpp"
#include "sfrc/io.hpp"
#include "sfrc/metrics.hpp"
#include "sfrc/scanner.hpp"
