#pragma once

#define RATL_VERSION "0.1.0"
