#pragma once

#include "rotwave/angular.hpp"
#include "rotwave/carpets.hpp"
#include "rotwave/ce.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"
#include "rotwave/revivals.hpp"
#include "rotwave/version.hpp"
#include "rotwave/wavepacket.hpp"
