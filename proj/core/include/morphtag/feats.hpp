#pragma once

#include <map>
#include <string>
#include <string_view>

namespace morphtag {

// FEATS column codec. "_" denotes the empty map; otherwise the column is a
// pipe-joined list of Key=Value pairs.
std::map<std::string, std::string> parse_feats(std::string_view raw);

// Keys sorted case-insensitively, joined "K=V|K=V". Pairs whose value is
// "None" are omitted (absence of the feature); an empty result renders "_".
std::string format_feats(const std::map<std::string, std::string>& feats);

// Case-insensitive comparison used for feature-key ordering, with a bytewise
// tie-break so the order is total.
bool feat_key_less(std::string_view a, std::string_view b);

}  // namespace morphtag
