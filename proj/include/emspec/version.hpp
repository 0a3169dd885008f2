#pragma once

#define EMSPEC_VERSION "0.1.0"
