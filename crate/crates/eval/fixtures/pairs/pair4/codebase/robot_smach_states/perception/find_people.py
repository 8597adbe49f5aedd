import rospy
import smach


class FindPerson(smach.State):
    """Turn the head around until a person, optionally a named one, is seen."""

    def __init__(self, robot, name=None, timeout=20.0):
        smach.State.__init__(self, outcomes=["found", "not_found", "preempted"])
        self.robot = robot
        self.name = name
        self.timeout = timeout

    def execute(self, userdata=None):
        start = rospy.Time.now()
        while (rospy.Time.now() - start).to_sec() < self.timeout:
            if self.preempt_requested():
                return "preempted"
            people = self.robot.perception.detect_person_3d()
            if any(self.name is None or p.name == self.name for p in people):
                return "found"
            self.robot.head.turn_step()
        return "not_found"


class FindCrowd(smach.State):
    """Look for at least `min_people` persons standing together."""

    def __init__(self, robot, min_people=2, timeout=30.0):
        smach.State.__init__(self, outcomes=["found"])
        self.robot = robot
        self.min_people = min_people
        self.timeout = timeout

    def execute(self, userdata=None):
        while True:
            people = self.robot.perception.detect_person_3d()
            if len(people) >= self.min_people:
                return "found"
            self.robot.head.turn_step()
