#pragma once

#include <stdexcept>
#include <string>

#include "hvdflow/grid.hpp"

namespace hvdflow {

// Malformed or unreadable file content.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Middlebury .flo layout: 4-byte tag "PIEH" (float 202021.25, little endian),
// int32 width, int32 height, then rows of interleaved float32 (u, v) pairs.
FlowField read_flo(const std::string& path);
void write_flo(const std::string& path, const FlowField& v);

}  // namespace hvdflow
