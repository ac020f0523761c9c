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

#include "clinex/synthetic.h"

#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

namespace clinex {

namespace {

struct ToyConcept {
  const char *cui;
  std::vector<const char *> terms;
  std::vector<const char *> tuis;
  // Class of real mentions; unset for noise concepts.
  std::optional<EntityClass> cls;
  const char *abbreviation = nullptr;
};

const std::vector<ToyConcept> &ToyConcepts() {
  using E = EntityClass;
  static const std::vector<ToyConcept> concepts = {
      // Drugs.
      {"C0000970", {"paracetamol", "acetaminofeno"}, {"T121"}, E::kDrug},
      {"C0020740", {"ibuprofeno"}, {"T121"}, E::kDrug},
      {"C0008838", {"cisplatina"}, {"T121"}, E::kDrug},
      {"C0079083", {"carboplatina"}, {"T121"}, E::kDrug},
      {"C0144576", {"paclitaxel"}, {"T121"}, E::kDrug},
      {"C0246415", {"docetaxel"}, {"T121"}, E::kDrug},
      {"C0039286", {"tamoxifeno"}, {"T121"}, E::kDrug},
      {"C0246421", {"letrozol"}, {"T121"}, E::kDrug},
      {"C0728747", {"trastuzumabe"}, {"T121"}, E::kDrug},
      {"C0011777", {"dexametasona"}, {"T121"}, E::kDrug},
      {"C0061851", {"ondansetrona"}, {"T121"}, E::kDrug},
      {"C0026549", {"morfina"}, {"T121"}, E::kDrug},
      {"C0028978", {"omeprazol"}, {"T121"}, E::kDrug},
      {"C0002645", {"amoxicilina"}, {"T195"}, E::kDrug},
      {"C0257685", {"ácido zoledrônico"}, {"T121"}, E::kDrug},
      // Two semantic types in different classes; mentions are drugs.
      {"C0060304", {"sulfato ferroso"}, {"T121", "T047"}, E::kDrug},
      // Procedures.
      {"C0024881", {"mastectomia"}, {"T061"}, E::kProcedure},
      {"C0392920", {"quimioterapia"}, {"T061"}, E::kProcedure, "QT"},
      {"C1522449", {"radioterapia"}, {"T061"}, E::kProcedure, "RT"},
      {"C0040405", {"tomografia computadorizada"}, {"T060"}, E::kProcedure, "TC"},
      {"C0024485", {"ressonância magnética"}, {"T060"}, E::kProcedure, "RM"},
      {"C0005558", {"biópsia"}, {"T060"}, E::kProcedure},
      {"C0009378", {"colonoscopia"}, {"T060"}, E::kProcedure},
      {"C0009555", {"hemograma completo", "hemograma"}, {"T059"}, E::kProcedure},
      {"C0020699", {"histerectomia"}, {"T061"}, E::kProcedure},
      {"C0553794", {"punção lombar"}, {"T060"}, E::kProcedure},
      {"C0013516", {"ecocardiograma"}, {"T060"}, E::kProcedure},
      {"C0917927", {"cirurgia conservadora da mama"}, {"T061"}, E::kProcedure},
      {"C0024671", {"mamografia"}, {"T060"}, E::kProcedure},
      {"C0199168", {"consulta de enfermagem"}, {"T058"}, E::kProcedure},
      // Diseases.
      {"C1134719", {"carcinoma ductal invasivo"}, {"T191"}, E::kDisease, "CDI"},
      {"C0006142", {"câncer de mama", "neoplasia maligna da mama"}, {"T191"}, E::kDisease},
      {"C0152013", {"adenocarcinoma de pulmão"}, {"T191"}, E::kDisease},
      {"C0020538", {"hipertensão arterial sistêmica", "hipertensão"}, {"T047"}, E::kDisease,
       "HAS"},
      {"C0011849", {"diabetes mellitus"}, {"T047"}, E::kDisease, "DM"},
      {"C0035078", {"insuficiência renal"}, {"T047"}, E::kDisease},
      {"C0002871", {"anemia"}, {"T047"}, E::kDisease},
      {"C0027947", {"neutropenia febril", "neutropenia"}, {"T047"}, E::kDisease},
      {"C0024305", {"linfoma não hodgkin"}, {"T191"}, E::kDisease},
      {"C0025202", {"melanoma"}, {"T191"}, E::kDisease},
      {"C0032285", {"pneumonia"}, {"T047"}, E::kDisease},
      {"C0149871", {"trombose venosa profunda"}, {"T046"}, E::kDisease, "TVP"},
      {"C0338831", {"mucosite"}, {"T047"}, E::kDisease},
      {"C0027627", {"metástase óssea"}, {"T191"}, E::kDisease},
      // Vague terms with relevant semantic types.
      {"C0087111", {"tratamento"}, {"T061"}, std::nullopt},
      {"C0012634", {"doença"}, {"T047"}, std::nullopt},
      {"C0013227", {"medicação"}, {"T121"}, std::nullopt},
      {"C0582103", {"exame"}, {"T060"}, std::nullopt},
      {"C0030193", {"dor"}, {"T184"}, std::nullopt},
      // Semantic types outside the grouping.
      {"C0030705", {"paciente"}, {"T101"}, std::nullopt},
      {"C0439228", {"dia"}, {"T079"}, std::nullopt},
      {"C0178602", {"dose"}, {"T081"}, std::nullopt},
      {"C0024091", {"mama"}, {"T023"}, std::nullopt},
      {"C0332156", {"retorno"}, {"T169"}, std::nullopt},
  };
  return concepts;
}

const std::vector<const char *> kDrugDistractors = {
    "própolis", "babosa",   "florais",  "garrafada", "cúrcuma",  "spirulina",
    "colágeno", "levedura", "guaraná",  "ginseng",   "maracujina", "alcachofra",
    "camomila", "boldo",    "carqueja", "espinheira", "moringa",  "chlorella"};
const std::vector<const char *> kProcDistractors = {
    "acupuntura", "massagem",  "caminhada", "hidroginástica", "alongamento",
    "pilates",    "meditação", "reiki",     "auriculoterapia", "musicoterapia"};
const std::vector<const char *> kDisDistractors = {
    "cansaço", "mal-estar", "indisposição", "desânimo", "fraqueza",
    "enjoo",   "sonolência", "inapetência", "irritabilidade", "tristeza"};

// Slots: {DRUG} {PROC} {DIS} real mentions; {XDRUG} {XPROC} {XDIS}
// out-of-dictionary words in the same contexts; {NUM} {DATE}.
const std::vector<const char *> kTemplates = {
    "Paciente com {DIS} em uso de {DRUG}.",
    "Realizou {PROC} em {DATE} sem intercorrências.",
    "Iniciou tratamento com {DRUG} {NUM} mg ao dia.",
    "Diagnóstico de {DIS} confirmado por {PROC}.",
    "Refere dor leve após {PROC}, prescrito {DRUG}.",
    "Nega {DIS} e {DIS}.",
    "Em uso de {XDRUG} e {DRUG}.",
    "Encaminhada para {PROC} devido a {DIS}.",
    "Mantém {DRUG} e {DRUG}.",
    "Histórico familiar de {DIS}.",
    "Solicitado {PROC} para avaliar {DIS}.",
    "Programada {PROC} para a próxima semana.",
    "Suspenso {DRUG} por {DIS}.",
    "Relata uso de {XDRUG} junto com {DRUG}.",
    "Queixa de {XDIS} após {PROC}.",
    "Orientada a fazer {XPROC} após {PROC}.",
    "{PROC} evidenciou {DIS}.",
    "Medicação mantida: {DRUG} {NUM} mg.",
    "Doença estável, em controle com {DRUG}.",
    "Paciente em {PROC} com boa tolerância.",
    "Evoluiu com {DIS} após {PROC}.",
    "Apresenta {XDIS} e {DIS} desde {DATE}.",
    "Exame físico sem alterações, retorno em {NUM} dias.",
    "Faz {XPROC} e {PROC} semanalmente.",
    "Prescrito {DRUG} para {DIS}.",
    "Dose de {DRUG} ajustada por {DIS}.",
};

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {
    for (const auto &c : ToyConcepts()) {
      if (c.cls) by_class_[*c.cls].push_back(&c);
    }
  }

  size_t Pick(size_t n) { return static_cast<size_t>(rng_() % n); }

  // One sentence and its mentions.
  std::pair<std::string, std::vector<Mention>> Sentence() {
    std::string tmpl = kTemplates[Pick(kTemplates.size())];
    std::string out;
    std::vector<Mention> mentions;
    size_t i = 0;
    while (i < tmpl.size()) {
      if (tmpl[i] != '{') {
        out.push_back(tmpl[i++]);
        continue;
      }
      size_t close = tmpl.find('}', i);
      std::string slot = tmpl.substr(i + 1, close - i - 1);
      i = close + 1;
      std::string fill;
      std::optional<EntityClass> cls;
      if (slot == "DRUG") cls = EntityClass::kDrug;
      if (slot == "PROC") cls = EntityClass::kProcedure;
      if (slot == "DIS") cls = EntityClass::kDisease;
      if (cls) {
        fill = Surface(*cls);
      } else if (slot == "XDRUG") {
        fill = kDrugDistractors[Pick(kDrugDistractors.size())];
      } else if (slot == "XPROC") {
        fill = kProcDistractors[Pick(kProcDistractors.size())];
      } else if (slot == "XDIS") {
        fill = kDisDistractors[Pick(kDisDistractors.size())];
      } else if (slot == "NUM") {
        fill = std::to_string(1 + Pick(500));
      } else if (slot == "DATE") {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%02zu/%02zu/20%02zu", 1 + Pick(28), 1 + Pick(12),
                      15 + Pick(8));
        fill = buf;
      } else {
        throw std::logic_error("unknown template slot " + slot);
      }
      if (out.empty()) {
        if (fill.empty() || fill[0] < 'A' || fill[0] > 'z') {
          throw std::logic_error("sentence must start with an ASCII letter");
        }
        if (fill[0] >= 'a') fill[0] = static_cast<char>(fill[0] - 'a' + 'A');
      }
      if (cls) mentions.push_back({Span{out.size(), out.size() + fill.size()}, *cls});
      out += fill;
    }
    return {out, mentions};
  }

 private:
  std::string Surface(EntityClass cls) {
    const auto &pool = by_class_.at(cls);
    const ToyConcept &c = *pool[Pick(pool.size())];
    if (c.abbreviation && Pick(4) == 0) return c.abbreviation;
    return c.terms[Pick(c.terms.size())];
  }

  std::mt19937_64 rng_;
  std::map<EntityClass, std::vector<const ToyConcept *>> by_class_;
};

}  // namespace

KnowledgeBase SyntheticKb() {
  std::vector<Concept> concepts;
  for (const auto &c : ToyConcepts()) {
    Concept k;
    k.cui = c.cui;
    for (const char *t : c.terms) k.terms.push_back({t, "POR"});
    for (const char *t : c.tuis) k.tuis.insert(t);
    concepts.push_back(std::move(k));
  }
  return KnowledgeBase::FromConcepts(std::move(concepts));
}

Glossary SyntheticGlossary() {
  Glossary g;
  for (const auto &c : ToyConcepts()) {
    if (c.abbreviation) g.Add(c.abbreviation, c.terms.front());
  }
  return g;
}

SyntheticData GenerateSynthetic(uint64_t seed, size_t target_sentences) {
  SyntheticData data;
  data.kb = SyntheticKb();
  data.glossary = SyntheticGlossary();
  Generator gen(seed);
  std::set<std::string> unique;
  size_t doc_no = 0;
  while (unique.size() < target_sentences) {
    size_t count = 6 + gen.Pick(7);
    std::string text;
    for (size_t s = 0; s < count; ++s) {
      auto [sentence, mentions] = gen.Sentence();
      auto [it, inserted] = data.truth.emplace(sentence, mentions);
      if (!inserted && it->second != mentions) {
        throw std::logic_error("generated sentence with two mention layouts: " + sentence);
      }
      if (!text.empty()) text += (s % 4 == 0) ? "\n" : " ";
      text += sentence;
    }
    char id[32];
    std::snprintf(id, sizeof(id), "note%04zu", ++doc_no);
    RawDocument doc = MakeDocument(id, text);
    for (const auto &s : segment(doc)) {
      if (!data.truth.count(s.text)) {
        throw std::logic_error("segmentation did not reproduce a generated sentence: " +
                               s.text);
      }
      unique.insert(s.text);
    }
    data.documents.push_back(std::move(doc));
  }
  return data;
}

}  // namespace clinex
