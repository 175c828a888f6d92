#include "cgra/memory.hpp"

#include <cstdio>
#include <sstream>

#include "cgra/arch.hpp"
#include "cgra/error.hpp"

namespace cgra {

MemoryGeometry memory_geometry(const RoutingGraph& rg) {
  MemoryGeometry g;
  g.word_width = rg.word_width;
  for (const auto& mu : rg.mus)
    for (int b = 0; b < mu.banks; ++b) g.bank_depths.push_back(mu.bank_depth);
  return g;
}

MemoryImage MemoryImage::zeros(const MemoryGeometry& geometry) {
  MemoryImage m;
  m.word_width = geometry.word_width;
  for (int depth : geometry.bank_depths) m.banks.emplace_back(static_cast<std::size_t>(depth), Word{0});
  return m;
}

std::string bank_to_hex(const std::vector<Word>& bank, int word_width) {
  const int digits = (word_width + 3) / 4;
  std::string out;
  char buf[32];
  for (Word w : bank) {
    std::snprintf(buf, sizeof buf, "%0*llx\n", digits, static_cast<unsigned long long>(truncate(w, word_width)));
    out += buf;
  }
  return out;
}

std::vector<Word> bank_from_hex(std::string_view text, int word_width) {
  std::vector<Word> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      std::size_t used = 0;
      Word w = std::stoull(line, &used, 16);
      out.push_back(truncate(w, word_width));
    } catch (const std::exception&) {
      throw Error(ErrorCode::SchemaError, "bad hex memory line '" + line + "'");
    }
  }
  return out;
}

}  // namespace cgra
