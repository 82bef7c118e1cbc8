#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sensefeat/pipeline.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename Parse>
std::set<T> parse_set(const std::string& list, Parse parse, const char* what) {
  std::set<T> out;
  for (const auto& item : split_list(list)) {
    const auto v = parse(item);
    if (!v) throw CLI::ValidationError(what, "unknown value '" + item + "'");
    out.insert(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sensefeat;
  CLI::App app{"Extract behavioral features from passive sensing streams"};
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string config, input, output, format = "csv";
  std::string sensors, participants, epochs, granularities;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("--config", config, "Run config (TOML)")->required();
  app.add_option("--input", input, "Input directory laid out as <participant>/<sensor>.csv")
      ->required();
  app.add_option("--output", output, "Output feature matrix path")->required();
  app.add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--sensors", sensors, "Comma-separated sensor list");
  app.add_option("--participants", participants, "Comma-separated participant ids");
  app.add_option("--epochs", epochs, "Comma-separated epochs");
  app.add_option("--granularities", granularities, "Comma-separated granularities");
  app.add_option("--seed", seed, "Seed for device clustering");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  RunOptions options;
  try {
    app.parse(argc, argv);
    options.config_path = config;
    options.input_dir = input;
    options.output_path = output;
    options.format = *parse_matrix_format(format);
    if (!sensors.empty()) options.sensors = parse_set<Sensor>(sensors, parse_sensor, "--sensors");
    if (!participants.empty()) {
      const auto ids = split_list(participants);
      options.participants = std::set<std::string>(ids.begin(), ids.end());
    }
    if (!epochs.empty()) options.epochs = parse_set<Epoch>(epochs, parse_epoch, "--epochs");
    if (!granularities.empty()) {
      options.granularities =
          parse_set<Granularity>(granularities, parse_granularity, "--granularities");
    }
    options.seed = seed;
    options.jobs = jobs;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }
  return run(options);
}
