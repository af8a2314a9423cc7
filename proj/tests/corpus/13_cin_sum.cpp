#include <iostream>
#include <vector>
using namespace std;

int main() {
  int n;
  cin >> n;
  vector<int> values(n);
  for (int i = 0; i < n; i++) {
    cin >> values[i];
  }
  int best = values[0];
  int sum = 0;
  for (int i = 0; i < n; i++) {
    sum += values[i];
    if (values[i] > best) {
      best = values[i];
    }
  }
  char grade;
  double weight;
  cin >> grade >> weight;
  cout << "sum " << sum << " max " << best << endl;
  cout << grade << " " << weight * sum << endl;
  return 0;
}
