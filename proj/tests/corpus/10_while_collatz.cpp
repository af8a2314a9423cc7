#include <iostream>
using namespace std;

int main() {
  int n = 27;
  int steps = 0;
  int peak = n;
  while (n != 1) {
    if (n % 2 == 0) {
      n /= 2;
    } else {
      n = 3 * n + 1;
    }
    if (n > peak) {
      peak = n;
    }
    steps++;
  }
  cout << "steps " << steps << " peak " << peak << endl;
  int m = 100;
  m -= 1;
  m *= 3;
  m %= 7;
  cout << m << endl;
  return 0;
}
