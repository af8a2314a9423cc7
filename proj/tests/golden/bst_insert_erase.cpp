#include <map>
using namespace std;

int main() {
  map<int, int> m;
  m[5] = 1;
  m[8] = 1;
  m[6] = 1;
  m.erase(6);
  return 0;
}
