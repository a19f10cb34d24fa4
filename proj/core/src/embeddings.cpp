#include "morphtag/embeddings.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace morphtag {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_int(std::string_view s, long* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::string buf(s);
  long v = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size()) return false;
  *out = v;
  return true;
}

bool parse_real(std::string_view s, Real* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::string buf(s);
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return false;
  *out = static_cast<Real>(v);
  return true;
}

}  // namespace

EmbeddingTable parse_embeddings_text(std::string_view text, std::ostream* warnings) {
  EmbeddingTable table;
  int dim = 0;
  size_t line_no = 0;
  size_t pos = 0;
  bool first = true;

  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    auto fields = split_ws(line);
    if (fields.empty()) continue;

    if (first) {
      first = false;
      long a, b;
      if (fields.size() == 2 && parse_int(fields[0], &a) && parse_int(fields[1], &b)) {
        dim = static_cast<int>(b);  // header line: (count, dim)
        table = EmbeddingTable(dim);
        continue;
      }
    }
    if (dim == 0) {
      dim = static_cast<int>(fields.size()) - 1;
      if (dim < 1) throw std::runtime_error("embeddings: first line has no vector entries");
      table = EmbeddingTable(dim);
    }

    if (static_cast<int>(fields.size()) != dim + 1) {
      if (warnings)
        *warnings << "embeddings: skipping line " << line_no << " (" << fields.size() - 1
                  << " values, expected " << dim << ")\n";
      continue;
    }
    std::vector<Real> v(static_cast<size_t>(dim));
    bool ok = true;
    for (int i = 0; i < dim; ++i)
      if (!parse_real(fields[static_cast<size_t>(i) + 1], &v[static_cast<size_t>(i)])) {
        ok = false;
        break;
      }
    if (!ok) {
      if (warnings) *warnings << "embeddings: skipping line " << line_no << " (unparseable value)\n";
      continue;
    }
    std::string token(fields[0]);
    if (table.contains(token)) {
      if (warnings)
        *warnings << "embeddings: skipping line " << line_no << " (duplicate token \"" << token
                  << "\")\n";
      continue;
    }
    table.insert(token, std::move(v));
  }
  return table;
}

EmbeddingTable load_embeddings_file(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_embeddings_text(buf.str(), warnings);
}

}  // namespace morphtag
