#include "fieldcalc/stdlib.hpp"

#include <algorithm>
#include <stdexcept>

#include "fieldcalc/typer.hpp"

namespace fieldcalc {

namespace {

struct Spec {
  const char* name;
  const char* type;
  const char* annotated;
  std::vector<std::string> deps;
};

const std::vector<Spec>& specs() {
  static const std::vector<Spec> s = {
      {"distance-to", "(bool) -> num", "(bool) -> num", {}},
      {"gradcast", "forall s. (bool, s) -> s", "forall l. (bool, l) -> l", {}},
      {"deploy", "forall s. (num, bool, () -> s, () -> s) -> s",
       "forall l. (num, bool, () -> l, () -> l) -> l", {"distance-to", "gradcast"}},
      {"virtual-machine", "() -> num", "() -> num", {"distance-to", "gradcast", "deploy"}},
      {"parent", "forall s. (s) -> num", "(num) -> num", {}},
      {"converge-sum", "forall s. (s, num) -> num", "(num, num) -> num", {"parent"}},
      {"low-pass", "(num, num) -> num", "(num, num) -> num", {}},
      {"injection", "() -> num", "() -> num",
       {"distance-to", "parent", "converge-sum", "low-pass"}},
  };
  return s;
}

const CorpusEntry& find(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  auto it = std::find_if(corpus.begin(), corpus.end(),
                         [&](const CorpusEntry& e) { return e.name == name; });
  if (it == corpus.end()) throw std::invalid_argument("no corpus entry '" + name + "'");
  return *it;
}

}  // namespace

std::string corpus_dir() { return FIELDCALC_CORPUS_DIR; }

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& s : specs()) {
    CorpusEntry e;
    e.name = s.name;
    e.path = dir + "/" + s.name + ".hfc";
    e.source = read_source(e.path).text;
    e.declared_type = parse_type(s.type);
    e.annotated_type = parse_type(s.annotated);
    e.deps = s.deps;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<SourceFile> corpus_sources(const std::vector<CorpusEntry>& corpus,
                                       const std::string& name) {
  const CorpusEntry& e = find(corpus, name);
  std::vector<SourceFile> files;
  for (const auto& d : e.deps) {
    const CorpusEntry& dep = find(corpus, d);
    files.push_back({dep.path, dep.source});
  }
  files.push_back({e.path, e.source});
  return files;
}

TypeScheme infer_entry(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  return typecheck_unit(parse_units(corpus_sources(corpus, name)));
}

bool annotation_consistent(const TypeScheme& principal, const TypeScheme& annotated) {
  return instance_of(annotated, principal) || instance_of(principal, annotated);
}

std::vector<SourceFile> corpus_library(const std::vector<CorpusEntry>& corpus) {
  std::vector<SourceFile> files;
  for (const auto& e : corpus)
    if (e.name != "injection") files.push_back({e.path, e.source});
  return files;
}

}  // namespace fieldcalc
