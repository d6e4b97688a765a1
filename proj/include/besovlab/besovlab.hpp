#pragma once

#include "besovlab/error.hpp"
#include "besovlab/spectral.hpp"
#include "besovlab/littlewood_paley.hpp"
#include "besovlab/initial_data.hpp"
#include "besovlab/pde_models.hpp"
#include "besovlab/evolution.hpp"
#include "besovlab/report.hpp"
#include "besovlab/experiments.hpp"
#include "besovlab/config.hpp"
