n = int(input())
print("Reverse:", int(str(n)[::-1]))
