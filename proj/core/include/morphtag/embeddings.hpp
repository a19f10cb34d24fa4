#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "morphtag/schema.hpp"

namespace morphtag {

// Text word-vector format: an optional first header line with two integers
// (count, dim), then one token followed by `dim` floats per line, separated
// by whitespace. Lines that do not fit (wrong float count, duplicate token)
// are skipped with a warning.
EmbeddingTable parse_embeddings_text(std::string_view text, std::ostream* warnings = nullptr);

EmbeddingTable load_embeddings_file(const std::string& path, std::ostream* warnings = nullptr);

}  // namespace morphtag
