#pragma once

#include <filesystem>

#include "cbseg/codebook.hpp"
#include "cbseg/mog.hpp"

namespace cbseg {

// Binary model dumps, little-endian, versioned ("CBSM", version 1). The
// layout is documented in the README so dumps can be produced and consumed
// across separate CLI invocations.
enum class ModelKind : std::uint8_t { codebook = 0, mog = 1 };

void save_model(const CodebookModel& model, const std::filesystem::path& path);
void save_model(const MogModel& model, const std::filesystem::path& path);

/// Reads just the header; throws on anything that is not a model dump.
ModelKind peek_model_kind(const std::filesystem::path& path);

CodebookModel load_codebook_model(const std::filesystem::path& path);
MogModel load_mog_model(const std::filesystem::path& path);

} // namespace cbseg
