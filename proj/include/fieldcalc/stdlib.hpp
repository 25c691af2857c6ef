#ifndef FIELDCALC_STDLIB_HPP
#define FIELDCALC_STDLIB_HPP

#include <string>
#include <vector>

#include "fieldcalc/parser.hpp"
#include "fieldcalc/types.hpp"

namespace fieldcalc {

struct CorpusEntry {
  std::string name;
  std::string path;
  std::string source;
  // Principal type the checker must infer.
  TypeScheme declared_type;
  // Type written next to the definition in the library listing. Either an
  // instance of the principal type or a generalisation of it over sorts.
  TypeScheme annotated_type;
  // Corpus entries whose declarations this one calls, in dependency order.
  std::vector<std::string> deps;
};

std::string corpus_dir();

// Reads every corpus file. Throws on a missing file.
std::vector<CorpusEntry> load_corpus(const std::string& dir = corpus_dir());

// The entry's own file preceded by its dependencies' files.
std::vector<SourceFile> corpus_sources(const std::vector<CorpusEntry>& corpus,
                                       const std::string& name);

// Type of the entry: its last declaration, or its main expression.
TypeScheme infer_entry(const std::vector<CorpusEntry>& corpus, const std::string& name);

// Whether an annotation is consistent with a principal type: one is an
// instance of the other.
bool annotation_consistent(const TypeScheme& principal, const TypeScheme& annotated);

// All corpus declarations, dependency-ordered, for use as a library.
std::vector<SourceFile> corpus_library(const std::vector<CorpusEntry>& corpus);

}  // namespace fieldcalc

#endif
