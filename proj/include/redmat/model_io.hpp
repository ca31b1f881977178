#pragma once

#include "redmat/model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace redmat {

inline constexpr int kModelFormatVersion = 1;

/// Raised for malformed model text: bad JSON, missing or mistyped fields,
/// unknown keys. The message names the offending key.
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the JSON model format (see docs/model.schema.json).
StructuralModel parse_model(const std::string& text);
std::string dump_model(const StructuralModel& model);

StructuralModel read_model(const std::filesystem::path& path);
void write_model(const StructuralModel& model, const std::filesystem::path& path);

} // namespace redmat
