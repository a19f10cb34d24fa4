#include "morphtag/feats.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <vector>

namespace morphtag {

bool feat_key_less(std::string_view a, std::string_view b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int ca = std::tolower(static_cast<unsigned char>(a[i]));
    int cb = std::tolower(static_cast<unsigned char>(b[i]));
    if (ca != cb) return ca < cb;
  }
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::map<std::string, std::string> parse_feats(std::string_view raw) {
  std::map<std::string, std::string> out;
  if (raw == "_" || raw.empty()) return out;
  size_t start = 0;
  while (start <= raw.size()) {
    size_t bar = raw.find('|', start);
    std::string_view segment =
        raw.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    size_t eq = segment.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw std::runtime_error("malformed FEATS segment \"" + std::string(segment) + "\"");
    out.emplace(std::string(segment.substr(0, eq)), std::string(segment.substr(eq + 1)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string format_feats(const std::map<std::string, std::string>& feats) {
  std::vector<const std::pair<const std::string, std::string>*> entries;
  for (const auto& kv : feats)
    if (kv.second != "None") entries.push_back(&kv);
  if (entries.empty()) return "_";
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return feat_key_less(a->first, b->first); });
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) out += '|';
    out += entries[i]->first;
    out += '=';
    out += entries[i]->second;
  }
  return out;
}

}  // namespace morphtag
