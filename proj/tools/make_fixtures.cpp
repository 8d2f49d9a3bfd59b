// Writes the fixture world: assets, indices, config, prompt file and a
// cassette recorded from the scripted model.
//
//   funscene_fixtures <dir> [--synthetic N]

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "fixture_world.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the fixture world"};
  std::string dir;
  std::size_t synthetic = 0;
  bool with_impossible = false;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--synthetic", synthetic, "Use N procedural prompts instead of the three base prompts");
  app.add_flag("--with-impossible", with_impossible, "Append a prompt no asset can satisfy");
  CLI11_PARSE(app, argc, argv);
  try {
    auto scenes = synthetic ? fixture::synthetic_scenes(synthetic) : fixture::base_scenes();
    if (with_impossible) scenes.push_back(fixture::impossible_scene());
    const auto config = fixture::write_world(dir, scenes);
    std::cout << config.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
