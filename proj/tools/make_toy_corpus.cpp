// Placeholder corpus generator.
int main() { return 0; }
