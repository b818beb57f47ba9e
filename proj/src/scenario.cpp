#include "cuegrid/scenario.hpp"

namespace cuegrid {

namespace {

constexpr std::string_view kPaperScenario =
    "####################################\n"
    "#.....#......#.DDDDDD.#............#\n"
    "#............#.D####D.#............#\n"
    "#.........1..#.D####D.#............#\n"
    "#.....#........DDDDDD..............#\n"
    "#.....#........DDDDDD.....##########\n"
    "#.....#......#............#........#\n"
    "#.2...##..#####..###.##...G........#\n"
    "#.........................G........#\n"
    "#..................DDD....#........#\n"
    "#..................D#D....#........#\n"
    "#..................D#D....#...T....#\n"
    "#..................DDD....G........#\n"
    "#.........................G........#\n"
    "#.....####..#######..###..#........#\n"
    "#.....#........#.......#..##########\n"
    "#.....#........#...................#\n"
    "#...3..........#.DDDDDD............#\n"
    "#........###...#.DDDDDD#...........#\n"
    "#.....#..###.....DD##DD#...........#\n"
    "#.....#..###.....DD##DD#...........#\n"
    "#.....#..DDD4..#.DD##DD#...........#\n"
    "#.....#..DDD...#.DD##DD#...........#\n"
    "####################################\n"
;

}  // namespace

std::string_view paper_scenario_text() { return kPaperScenario; }

GridMap paper_scenario() { return load_map(kPaperScenario); }

}  // namespace cuegrid
