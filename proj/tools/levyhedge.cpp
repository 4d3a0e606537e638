#include <cstdio>
int main() { std::puts("levyhedge: placeholder"); return 0; }
