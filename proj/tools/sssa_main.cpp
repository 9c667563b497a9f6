#include "sssa/cli.hpp"

int main(int argc, char** argv) { return sssa::dispatch(argc, argv); }
