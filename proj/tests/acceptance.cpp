// placeholder, replaced by the real acceptance suite
int main() { return 1; }
