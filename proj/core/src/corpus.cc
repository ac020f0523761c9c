// Copyright 2026 The clinex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clinex/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "clinex/error.h"
#include "clinex/unicode.h"

namespace clinex {

namespace {

std::string Where(const TaggedSentence &s, size_t position) {
  return s.doc_id + "#" + std::to_string(s.sentence_index) + " position " +
         std::to_string(position);
}

}  // namespace

std::string TagString(const Tag &tag) {
  std::string out = tag.iob == Iob::kB ? "B" : tag.iob == Iob::kI ? "I" : "O";
  if (tag.iob != Iob::kO && tag.cls) {
    out += "-";
    out += ClassName(*tag.cls);
  }
  return out;
}

std::optional<Tag> ParseTag(std::string_view s) {
  if (s == "O") return Tag{Iob::kO, std::nullopt};
  if (s.empty() || (s[0] != 'B' && s[0] != 'I')) return std::nullopt;
  Iob iob = s[0] == 'B' ? Iob::kB : Iob::kI;
  if (s.size() == 1) return Tag{iob, std::nullopt};
  if (s[1] != '-') return std::nullopt;
  auto cls = ParseClass(s.substr(2));
  if (!cls) return std::nullopt;
  return Tag{iob, cls};
}

void ValidateTags(const TaggedSentence &s) {
  if (s.tags.size() != s.tokens.size()) {
    throw DataError(s.doc_id + "#" + std::to_string(s.sentence_index) + ": " +
                    std::to_string(s.tags.size()) + " tags for " +
                    std::to_string(s.tokens.size()) + " tokens");
  }
  for (size_t i = 0; i < s.tags.size(); ++i) {
    const Tag &tag = s.tags[i];
    bool typed = s.scheme == Scheme::kTyped;
    if (tag.iob != Iob::kO && typed != tag.cls.has_value()) {
      throw DataError(Where(s, i) + ": tag " + TagString(tag) +
                      " does not belong to the " + (typed ? "typed" : "untyped") +
                      " scheme");
    }
    if (tag.iob != Iob::kI) continue;
    if (i == 0) throw DataError(Where(s, i) + ": I tag at sentence start");
    const Tag &prev = s.tags[i - 1];
    if (prev.iob == Iob::kO) throw DataError(Where(s, i) + ": I tag after O");
    if (typed && prev.cls != tag.cls) {
      throw DataError(Where(s, i) + ": " + TagString(tag) + " after " +
                      TagString(prev));
    }
  }
}

TaggedSentence to_iob(const Sentence &s, const std::vector<Mention> &mentions,
                      std::vector<std::string> *warnings) {
  TaggedSentence out;
  out.doc_id = s.doc_id;
  out.sentence_index = s.sentence_index;
  out.text = s.text;
  out.tokens = Tokenize(s.text);
  out.tags.assign(out.tokens.size(), Tag{});
  out.scheme = Scheme::kTyped;

  std::vector<Mention> sorted = mentions;
  std::sort(sorted.begin(), sorted.end());
  for (size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k - 1].span.Overlaps(sorted[k].span)) {
      throw DataError(s.doc_id + "#" + std::to_string(s.sentence_index) +
                      ": overlapping mentions");
    }
  }
  for (const Mention &m : sorted) {
    if (m.span.empty() || m.span.end > s.text.size()) {
      throw DataError(s.doc_id + "#" + std::to_string(s.sentence_index) +
                      ": mention span out of bounds");
    }
    size_t first = out.tokens.size();
    size_t last = 0;
    for (size_t i = 0; i < out.tokens.size(); ++i) {
      if (out.tokens[i].span.Overlaps(m.span)) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == out.tokens.size()) {
      throw DataError(s.doc_id + "#" + std::to_string(s.sentence_index) +
                      ": mention covers no token");
    }
    if (out.tokens[first].span.start != m.span.start ||
        out.tokens[last].span.end != m.span.end) {
      if (warnings) {
        warnings->push_back(s.doc_id + "#" + std::to_string(s.sentence_index) +
                            ": mention [" + std::to_string(m.span.start) + "," +
                            std::to_string(m.span.end) +
                            ") widened to token boundaries [" +
                            std::to_string(out.tokens[first].span.start) + "," +
                            std::to_string(out.tokens[last].span.end) + ")");
      }
    }
    for (size_t i = first; i <= last; ++i) {
      if (out.tags[i].iob != Iob::kO) {
        throw DataError(s.doc_id + "#" + std::to_string(s.sentence_index) +
                        ": mentions overlap after widening to tokens");
      }
      out.tags[i] = Tag{i == first ? Iob::kB : Iob::kI, m.cls};
    }
  }
  return out;
}

std::vector<Mention> from_iob(const TaggedSentence &t) {
  ValidateTags(t);
  if (t.scheme == Scheme::kUntyped && !t.entity_class) {
    bool any = std::any_of(t.tags.begin(), t.tags.end(),
                           [](const Tag &g) { return g.iob != Iob::kO; });
    if (any) {
      throw DataError(t.doc_id + "#" + std::to_string(t.sentence_index) +
                      ": untyped sentence without an entity class");
    }
  }
  std::vector<Mention> out;
  for (size_t i = 0; i < t.tags.size(); ++i) {
    if (t.tags[i].iob != Iob::kB) continue;
    size_t j = i + 1;
    while (j < t.tags.size() && t.tags[j].iob == Iob::kI) ++j;
    EntityClass cls = t.scheme == Scheme::kTyped ? *t.tags[i].cls : *t.entity_class;
    out.push_back(Mention{Span{t.tokens[i].span.start, t.tokens[j - 1].span.end}, cls});
    i = j - 1;
  }
  return out;
}

TaggedSentence ToUntyped(const TaggedSentence &typed, EntityClass c) {
  TaggedSentence out = typed;
  out.scheme = Scheme::kUntyped;
  out.entity_class = c;
  for (Tag &tag : out.tags) {
    if (tag.iob != Iob::kO && tag.cls == c) {
      tag.cls.reset();
    } else {
      tag = Tag{};
    }
  }
  return out;
}

Corpus ClassSubcorpus(const Corpus &typed, EntityClass c) {
  Corpus out;
  for (const auto &s : typed) {
    bool has = std::any_of(s.tags.begin(), s.tags.end(), [&](const Tag &t) {
      return t.iob == Iob::kB && t.cls == c;
    });
    if (has) out.push_back(ToUntyped(s, c));
  }
  return out;
}

void SplitSpec::Validate() const {
  auto in_range = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_range(test_fraction) || !in_range(val_fraction_of_remainder)) {
    throw std::invalid_argument("split fractions must be in (0, 1)");
  }
}

SplitSizes ComputeSplitSizes(size_t n, const SplitSpec &spec) {
  spec.Validate();
  auto round = [](double x) { return static_cast<size_t>(std::floor(x + 0.5)); };
  SplitSizes sizes;
  sizes.test = std::min(n, round(static_cast<double>(n) * spec.test_fraction));
  size_t remainder = n - sizes.test;
  sizes.validation = std::min(
      remainder, round(static_cast<double>(remainder) * spec.val_fraction_of_remainder));
  sizes.train = remainder - sizes.validation;
  return sizes;
}

CorpusSplit split(const Corpus &corpus, const SplitSpec &spec) {
  if (corpus.size() < 3) {
    throw DataError("cannot split a corpus of " + std::to_string(corpus.size()) +
                    " sentences (need at least 3)");
  }
  SplitSizes sizes = ComputeSplitSizes(corpus.size(), spec);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto take = [&](size_t from, size_t count) {
    std::vector<size_t> idx(order.begin() + from, order.begin() + from + count);
    std::sort(idx.begin(), idx.end());
    Corpus part;
    for (size_t i : idx) part.push_back(corpus[i]);
    return part;
  };
  CorpusSplit out;
  out.test = take(0, sizes.test);
  out.validation = take(sizes.test, sizes.validation);
  out.train = take(sizes.test + sizes.validation, sizes.train);
  return out;
}

CorpusStats stats(const Corpus &corpus) {
  CorpusStats st;
  st.sentences = corpus.size();
  for (const auto &s : corpus) {
    for (const Tag &t : s.tags) {
      switch (t.iob) {
        case Iob::kB: ++st.b_tokens; break;
        case Iob::kI: ++st.i_tokens; break;
        case Iob::kO: ++st.o_tokens; break;
      }
    }
  }
  return st;
}

StatsRow StatsByClass(const Corpus &typed) {
  StatsRow row;
  for (EntityClass c : kEntityClasses) row.per_class[c] = stats(ClassSubcorpus(typed, c));
  row.aggregated = stats(typed);
  return row;
}

std::string RenderStatsTable(const std::vector<std::pair<std::string, StatsRow>> &rows) {
  std::ostringstream out;
  size_t label_width = 10;
  for (const auto &r : rows) label_width = std::max(label_width, r.first.size());
  const int w = 8;
  auto group = [&](std::string_view title) {
    std::string t(title);
    out << "  " << std::left << std::setw(4 * w) << t << std::right;
  };
  out << std::setw(static_cast<int>(label_width)) << "";
  group("Procedures");
  group("Drugs");
  group("Diseases");
  group("Aggregated");
  out << "\n" << std::setw(static_cast<int>(label_width)) << "";
  for (int g = 0; g < 4; ++g) {
    out << "  " << std::setw(w) << "Sent" << std::setw(w) << "B" << std::setw(w)
        << "I" << std::setw(w) << "O";
  }
  out << "\n";
  auto cells = [&](const CorpusStats &s) {
    out << "  " << std::setw(w) << s.sentences << std::setw(w) << s.b_tokens
        << std::setw(w) << s.i_tokens << std::setw(w) << s.o_tokens;
  };
  for (const auto &[label, row] : rows) {
    out << std::left << std::setw(static_cast<int>(label_width)) << label << std::right;
    for (EntityClass c : kEntityClasses) {
      auto it = row.per_class.find(c);
      cells(it == row.per_class.end() ? CorpusStats{} : it->second);
    }
    cells(row.aggregated);
    out << "\n";
  }
  return out.str();
}

void WriteConll(const Corpus &corpus, std::ostream &out) {
  for (const auto &s : corpus) {
    out << "# " << s.doc_id << ' ' << s.sentence_index << '\n';
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i].text << '\t' << TagString(s.tags[i]) << '\n';
    }
    out << '\n';
  }
}

TaggedSentence MakeTaggedSentence(std::string doc_id, size_t sentence_index,
                                  const std::vector<std::string> &tokens,
                                  std::vector<Tag> tags, Scheme scheme,
                                  std::optional<EntityClass> entity_class) {
  TaggedSentence s;
  s.doc_id = std::move(doc_id);
  s.sentence_index = sentence_index;
  for (const auto &tok : tokens) {
    if (!s.text.empty()) s.text.push_back(' ');
    size_t start = s.text.size();
    s.text += tok;
    s.tokens.push_back(Token{tok, Span{start, s.text.size()}});
  }
  s.tags = std::move(tags);
  s.scheme = scheme;
  s.entity_class = scheme == Scheme::kUntyped ? entity_class : std::nullopt;
  ValidateTags(s);
  return s;
}

Corpus ReadConll(std::istream &in, const std::string &source,
                 std::optional<EntityClass> untyped_class) {
  struct Pending {
    std::string doc_id;
    size_t index = 0;
    std::vector<std::string> tokens;
    std::vector<Tag> tags;
    size_t first_line = 0;
  };
  std::vector<Pending> pending;
  Pending current;
  bool open = false;
  bool saw_typed = false;
  bool saw_untyped = false;
  size_t anonymous = 0;

  auto flush = [&]() {
    if (open && !current.tokens.empty()) pending.push_back(std::move(current));
    current = Pending{};
    open = false;
  };

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      flush();
      std::string header = line.substr(2);
      size_t space = header.rfind(' ');
      if (space == std::string::npos) {
        throw ParseError(source, line_no, "expected '# doc_id sentence_index'");
      }
      current.doc_id = header.substr(0, space);
      try {
        size_t used = 0;
        current.index = std::stoul(header.substr(space + 1), &used);
        if (used != header.size() - space - 1) throw std::invalid_argument("index");
      } catch (const std::exception &) {
        throw ParseError(source, line_no, "bad sentence index in header");
      }
      current.first_line = line_no;
      open = true;
      continue;
    }
    if (!open) {
      current.doc_id = source;
      current.index = anonymous++;
      current.first_line = line_no;
      open = true;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected TOKEN\\tTAG");
    }
    auto tag = ParseTag(std::string_view(line).substr(tab + 1));
    if (!tag || tab == 0) throw ParseError(source, line_no, "bad token or tag");
    if (tag->iob != Iob::kO) (tag->cls ? saw_typed : saw_untyped) = true;
    current.tokens.push_back(line.substr(0, tab));
    current.tags.push_back(*tag);
  }
  flush();

  if (saw_typed && saw_untyped) {
    throw DataError(source + ": file mixes typed and untyped tags");
  }
  Scheme scheme = saw_typed ? Scheme::kTyped
                  : saw_untyped || untyped_class ? Scheme::kUntyped
                                                 : Scheme::kTyped;
  if (scheme == Scheme::kUntyped && !untyped_class) {
    throw DataError(source + ": untyped corpus needs an entity class");
  }
  Corpus corpus;
  for (auto &p : pending) {
    try {
      corpus.push_back(MakeTaggedSentence(p.doc_id, p.index, p.tokens, std::move(p.tags),
                                          scheme, untyped_class));
    } catch (const DataError &e) {
      throw ParseError(source, p.first_line, e.what());
    }
  }
  return corpus;
}

Corpus ReadConll(const std::string &path, std::optional<EntityClass> untyped_class) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return ReadConll(in, path, untyped_class);
}

}  // namespace clinex
