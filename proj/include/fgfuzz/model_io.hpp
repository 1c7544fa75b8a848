#pragma once

#include "fgfuzz/model.hpp"

#include <stdexcept>
#include <string>

namespace fgfuzz {

// Malformed model file; message carries "<path>:<line>: ...".
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally well-formed file referencing an unknown identifier or command.
struct ReferenceError : std::runtime_error {
  explicit ReferenceError(const std::string& what) : std::runtime_error(what) {}
};

// Loads a model from the block-structured text format (see docs/model_format.md).
// Throws ParseError or ReferenceError. The result has all cross-references
// bound but is not otherwise validated; run validate() for invariant checks.
ProtocolModel load_model(const std::string& path);

// Parses model text directly (path used only for error messages).
ProtocolModel parse_model(const std::string& text, const std::string& path = "<string>");

// Canonical text form; load(save(m)) reproduces m.
std::string save_model(const ProtocolModel& model);

void save_model_file(const ProtocolModel& model, const std::string& path);

} // namespace fgfuzz
