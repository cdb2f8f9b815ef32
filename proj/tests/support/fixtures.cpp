#include "support/fixtures.hpp"

#include <sstream>

#include <json.hpp>

namespace hopsearch::testing {

SmallKgFiles write_small_kg(const TempDir& dir) {
  SmallKgFiles files;
  files.triples = dir.write("small_triples.tsv",
                            "E1\tR1\tE2\n"
                            "E4\tR1\tE2\n"
                            "E2\tR4\tE6\n"
                            "E2\tR2\tE3\n"
                            "E2\tR1\tE7\n"
                            "E3\tR2\tE8\n"
                            "E1\tR3\tE5\n"
                            "E4\tR3\tE5\n"
                            "E8\tR4\tE6\n"
                            "E5\tR4\tE6\n"
                            "E7\tR4\tE6\n"
                            "E4\tR4\tE6\n");
  files.entity_aliases = dir.write("small_entities.tsv",
                                   "E1\tAvatar\n"
                                   "E2\tJames Cameron\n"
                                   "E3\tPostcolonial Love Poem (book)\n"
                                   "E4\tTitanic\n"
                                   "E5\tAliens of the Deep\tAliens\n"
                                   "E6\tCanada\n"
                                   "E7\tfilm director\n"
                                   "E8\tNatalie Diaz\n");
  files.relation_aliases = dir.write("small_relations.tsv",
                                     "R1\tdirector\n"
                                     "R2\tauthor\twritten by\n"
                                     "R3\tcast member\n"
                                     "R4\tcountry\n");
  return files;
}

namespace {

const char* kQuestion =
    "What is the name of the play written in May 2016 by a playwright who won the MacArthur "
    "Fellowship the same year as the poet who wrote \"Postcolonial Love Poem\"?";

std::vector<docs::Document> three_hop_corpus() {
  return {
      {"d1", "Postcolonial Love Poem",
       "Postcolonial Love Poem is a poetry collection by Natalie Diaz. The book was published "
       "in March 2020 and won the Pulitzer Prize for Poetry."},
      {"d2", "Natalie Diaz",
       "Natalie Diaz is an American poet. She wrote the collection Postcolonial Love Poem and "
       "received a MacArthur Fellowship in 2018."},
      {"d3", "MacArthur Fellowship",
       "The MacArthur Fellowship is a prize awarded annually. The 2018 class of fellows "
       "included the poet Natalie Diaz and the playwright Dominique Morisseau."},
      {"d4", "Dominique Morisseau",
       "Dominique Morisseau is an American playwright from Detroit. Her play Skeleton Crew "
       "opened in May 2016, and she won the MacArthur Fellowship in 2018."},
      {"d5", "Skeleton Crew (play)",
       "Skeleton Crew is a play by Dominique Morisseau, written in May 2016. It is set in a "
       "Detroit stamping plant."},
      {"d6", "Avatar",
       "Avatar is a 2009 science fiction film directed by James Cameron. The cast includes Sam "
       "Worthington and Zoe Saldana."},
  };
}

const char* kThinks[4] = {
    "I need the poet who wrote Postcolonial Love Poem, then the playwright who won the "
    "MacArthur Fellowship the same year, and finally the play that playwright wrote in May "
    "2016.",
    "Natalie Diaz wrote Postcolonial Love Poem and received the MacArthur Fellowship in 2018. "
    "Now I need the playwright who won it in 2018.",
    "Dominique Morisseau is the playwright who won the 2018 MacArthur Fellowship. Next I need "
    "the play she wrote in May 2016.",
    "The play Dominique Morisseau wrote in May 2016 is Skeleton Crew.",
};

const char* kSearches[3] = {
    "{\"query\": \"which poet wrote Postcolonial Love Poem\", \"entity\": [\"Postcolonial Love "
    "Poem\"], \"relation\": [\"author\"]}",
    "{\"query\": \"which playwright won the MacArthur Fellowship in 2018\", \"entity\": "
    "[\"MacArthur Fellowship\"], \"relation\": [\"winner\"]}",
    "{\"query\": \"what play did Dominique Morisseau write in May 2016\", \"entity\": "
    "[\"Dominique Morisseau\"], \"relation\": [\"notable work\"]}",
};

const char* kAnswer = "The final answer is \\boxed{Skeleton Crew}";

}  // namespace

ThreeHopFixture make_three_hop_fixture(const TempDir& dir) {
  ThreeHopFixture fixture;
  fixture.question = kQuestion;
  fixture.corpus = three_hop_corpus();

  for (int i = 0; i < 3; ++i) {
    fixture.script.push_back(std::string("<think>") + kThinks[i] + "</think><search>" +
                             kSearches[i] + "</search>");
  }
  fixture.script.push_back(std::string("<think>") + kThinks[3] + "</think><answer>" + kAnswer +
                           "</answer>");

  fixture.gold.id = "threehop-1";
  fixture.gold.question = kQuestion;
  fixture.gold.answers = {"Skeleton Crew"};
  fixture.gold.supporting_titles = {"Postcolonial Love Poem", "MacArthur Fellowship",
                                    "Skeleton Crew (play)"};
  fixture.gold.hops = 3;

  // 30 triples over people, works, awards, and places in the story.
  fixture.kg_triples = dir.write("threehop_triples.tsv",
                                 "Q1\tP1\tQ2\n"    // Postcolonial Love Poem | author | Diaz
                                 "Q1\tP2\tQ12\n"   // Postcolonial Love Poem | award | Pulitzer
                                 "Q1\tP9\tQ15\n"
                                 "Q2\tP2\tQ3\n"    // Diaz | award received | MacArthur
                                 "Q2\tP4\tQ10\n"
                                 "Q2\tP8\tQ9\n"
                                 "Q2\tP3\tQ1\n"
                                 "Q2\tP7\tQ24\n"
                                 "Q4\tP2\tQ3\n"    // Morisseau | award received | MacArthur
                                 "Q4\tP4\tQ11\n"
                                 "Q4\tP7\tQ8\n"
                                 "Q4\tP8\tQ9\n"
                                 "Q4\tP3\tQ5\n"    // Morisseau | notable work | Skeleton Crew
                                 "Q5\tP1\tQ4\n"    // Skeleton Crew | author | Morisseau
                                 "Q5\tP9\tQ16\n"
                                 "Q5\tP11\tQ8\n"
                                 "Q6\tP5\tQ7\n"    // Avatar | director | Cameron
                                 "Q6\tP6\tQ13\n"
                                 "Q6\tP6\tQ14\n"
                                 "Q6\tP12\tQ22\n"
                                 "Q7\tP4\tQ17\n"
                                 "Q7\tP8\tQ18\n"
                                 "Q7\tP3\tQ6\n"
                                 "Q8\tP10\tQ9\n"
                                 "Q13\tP4\tQ19\n"
                                 "Q14\tP4\tQ19\n"
                                 "Q3\tP9\tQ21\n"
                                 "Q12\tP9\tQ21\n"
                                 "Q9\tP9\tQ25\n"
                                 "Q18\tP9\tQ25\n");
  fixture.kg_entity_aliases =
      dir.write("threehop_entities.tsv",
                "Q1\tPostcolonial Love Poem\n"
                "Q2\tNatalie Diaz\n"
                "Q3\tMacArthur Fellowship\tMacArthur Fellows Program\tMacArthur genius grant\n"
                "Q4\tDominique Morisseau\n"
                "Q5\tSkeleton Crew\tSkeleton Crew (play)\n"
                "Q6\tAvatar\tAvatar (2009 film)\n"
                "Q7\tJames Cameron\n"
                "Q8\tDetroit\n"
                "Q9\tUnited States\tUSA\n"
                "Q10\tpoet\n"
                "Q11\tplaywright\n"
                "Q12\tPulitzer Prize for Poetry\tPulitzer Prize\n"
                "Q13\tSam Worthington\n"
                "Q14\tZoe Saldana\n"
                "Q15\tpoetry collection\n"
                "Q16\tplay\tstage play\n"
                "Q17\tfilm director\n"
                "Q18\tCanada\n"
                "Q19\tactor\n"
                "Q21\taward\n"
                "Q22\tscience fiction\n"
                "Q24\tNeedles\n"
                "Q25\tcountry\n");
  fixture.kg_relation_aliases = dir.write("threehop_relations.tsv",
                                          "P1\tauthor\twritten by\n"
                                          "P2\taward received\twinner\n"
                                          "P3\tnotable work\n"
                                          "P4\toccupation\n"
                                          "P5\tdirector\tdirected by\n"
                                          "P6\tcast member\n"
                                          "P7\tplace of birth\tbirthplace\n"
                                          "P8\tcountry of citizenship\tcitizenship\n"
                                          "P9\tinstance of\n"
                                          "P10\tcountry\n"
                                          "P11\tnarrative location\tset in\n"
                                          "P12\tgenre\n");

  std::string jsonl;
  for (const docs::Document& doc : fixture.corpus) {
    nlohmann::ordered_json line{{"id", doc.id}, {"title", doc.title}, {"text", doc.text}};
    jsonl += line.dump() + "\n";
  }
  fixture.corpus_jsonl = dir.write("threehop_corpus.jsonl", jsonl);
  return fixture;
}

std::string three_hop_trajectory_text() {
  std::ostringstream out;
  for (int i = 0; i < 3; ++i) {
    out << "<think>" << kThinks[i] << "</think><search>" << kSearches[i]
        << "</search><result>retrieved evidence " << i + 1 << "</result>";
  }
  out << "<think>" << kThinks[3] << "</think><answer>" << kAnswer << "</answer>";
  return out.str();
}

}  // namespace hopsearch::testing
